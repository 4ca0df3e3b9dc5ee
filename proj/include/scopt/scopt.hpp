#pragma once

// Every module except the HTTP provider, which needs OpenSSL (see config.hpp).
#include "scopt/config.hpp"
#include "scopt/features/features.hpp"
#include "scopt/io/document.hpp"
#include "scopt/llm/client.hpp"
#include "scopt/llm/prompts.hpp"
#include "scopt/llm/stub.hpp"
#include "scopt/optimize/backend.hpp"
#include "scopt/optimize/dataset.hpp"
#include "scopt/pipeline/metrics.hpp"
#include "scopt/pipeline/pipeline.hpp"
#include "scopt/pipeline/splice.hpp"
#include "scopt/retrieval/bm25.hpp"
#include "scopt/retrieval/index.hpp"
#include "scopt/retrieval/lascore.hpp"
#include "scopt/retrieval/record.hpp"
#include "scopt/scop/affine.hpp"
#include "scopt/scop/dependence.hpp"
#include "scopt/scop/domain.hpp"
#include "scopt/scop/emit.hpp"
#include "scopt/scop/int_solver.hpp"
#include "scopt/scop/lexer.hpp"
#include "scopt/scop/model.hpp"
#include "scopt/scop/parser.hpp"
#include "scopt/scop/program.hpp"
#include "scopt/scop/region.hpp"
#include "scopt/synth/arrays.hpp"
#include "scopt/synth/bounds.hpp"
#include "scopt/synth/params.hpp"
#include "scopt/synth/program.hpp"
#include "scopt/synth/properties.hpp"
#include "scopt/synth/schedule.hpp"
#include "scopt/synth/synthesizer.hpp"
#include "scopt/util/error.hpp"
#include "scopt/util/parallel.hpp"
#include "scopt/util/process.hpp"
#include "scopt/util/rng.hpp"
#include "scopt/verify/compiler.hpp"
#include "scopt/verify/coverage.hpp"
#include "scopt/verify/harness.hpp"
#include "scopt/verify/inputs.hpp"
#include "scopt/verify/verifier.hpp"
