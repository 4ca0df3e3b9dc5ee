#pragma once

#include <string>
#include <vector>

// Seeded transformations for the differential verifier: each case is an
// original program and a replacement region.
namespace scopt::test {

struct CatalogCase {
  std::string name;
  std::string original;
  std::string region;
};

inline std::string catalog_program(const std::string& decls, const std::string& region, int n = 40) {
  return "#include <stdio.h>\n#define N " + std::to_string(n) + "\n" + decls +
         "\nint main(void) {\n  int i, j, k;\n#pragma scop\n" + region + "#pragma endscop\n  return 0;\n}\n";
}

inline const std::string kVec = "double A[N], B[N], C[N];\n";
inline const std::string kMat = "double A[N][N], B[N][N], C[N][N];\n";

inline std::vector<CatalogCase> illegal_catalog() {
  return {
      {"ReversedPrefixSum", catalog_program(kVec, "  for (i = 1; i < N; i++)\n    A[i] = A[i - 1] + B[i];\n"),
       "  for (i = N - 1; i >= 1; i--)\n    A[i] = A[i - 1] + B[i];\n"},
      {"InterchangeAgainstDistanceOneMinusOne",
       catalog_program(kMat,
                       "  for (i = 1; i < N; i++)\n    for (j = 0; j < N - 1; j++)\n"
                       "      A[i][j] = A[i - 1][j + 1] + B[i][j];\n"),
       "  for (j = 0; j < N - 1; j++)\n    for (i = 1; i < N; i++)\n      A[i][j] = A[i - 1][j + 1] + B[i][j];\n"},
      {"OffByOneTile",
       catalog_program(kMat, "  for (i = 0; i < N; i++)\n    for (j = 0; j < N; j++)\n      C[i][j] = A[i][j] + 1;\n"),
       "  for (t1 = 0; t1 < (N + 31) / 32; t1++)\n    for (i = 32 * t1; i < 32 * t1 + 31 && i < N; i++)\n"
       "      for (j = 0; j < N; j++)\n        C[i][j] = A[i][j] + 1;\n"},
      {"FusionReadingAheadOfTheProducer",
       catalog_program(kVec,
                       "  for (i = 0; i < N; i++)\n    A[i] = B[i] + 1;\n  for (i = 0; i < N - 1; i++)\n"
                       "    C[i] = A[i + 1] * 2;\n"),
       "  for (i = 0; i < N - 1; i++) {\n    A[i] = B[i] + 1;\n    C[i] = A[i + 1] * 2;\n  }\n  A[N - 1] = B[N - 1] + 1;\n"},
      {"DistributionAcrossACarriedCycle",
       catalog_program(kVec, "  for (i = 1; i < N; i++) {\n    A[i] = B[i - 1] + 1;\n    B[i] = A[i] * 2;\n  }\n"),
       "  for (i = 1; i < N; i++)\n    A[i] = B[i - 1] + 1;\n  for (i = 1; i < N; i++)\n    B[i] = A[i] * 2;\n"},
      {"ShiftWithoutAdjustingAllSubscripts",
       catalog_program(kVec, "  for (i = 1; i < N; i++)\n    A[i] = A[i - 1] + B[i];\n"),
       "  for (i = 0; i < N - 1; i++)\n    A[i + 1] = A[i] + B[i];\n"},
      {"OffByOneLowerBound", catalog_program(kVec, "  for (i = 0; i < N; i++)\n    C[i] = B[i] * 3 + 1;\n"),
       "  for (i = 1; i < N; i++)\n    C[i] = B[i] * 3 + 1;\n"},
      {"InnerReversalWithCarriedDependence",
       catalog_program(kMat, "  for (i = 0; i < N; i++)\n    for (j = 1; j < N; j++)\n      A[i][j] = A[i][j - 1] + B[i][j];\n"),
       "  for (i = 0; i < N; i++)\n    for (j = N - 1; j >= 1; j--)\n      A[i][j] = A[i][j - 1] + B[i][j];\n"},
      {"DroppedStatement",
       catalog_program(kVec, "  for (i = 0; i < N; i++) {\n    A[i] = B[i] + 1;\n    C[i] = A[i] * B[i];\n  }\n"),
       "  for (i = 0; i < N; i++)\n    A[i] = B[i] + 1;\n"},
      {"InitialisationMovedAfterAccumulation",
       catalog_program(kMat + "double s[N];\n",
                       "  for (i = 0; i < N; i++) {\n    s[i] = 0;\n    for (j = 0; j < N; j++)\n"
                       "      s[i] += A[i][j];\n  }\n"),
       "  for (i = 0; i < N; i++) {\n    for (j = 0; j < N; j++)\n      s[i] += A[i][j];\n    s[i] = 0;\n  }\n"},
  };
}

inline std::vector<CatalogCase> legal_catalog() {
  const std::string nest = "  for (i = 0; i < N; i++)\n    for (j = 0; j < N; j++)\n      C[i][j] = A[i][j] + B[j][i];\n";
  const std::string gemm =
      "  for (i = 0; i < N; i++)\n    for (j = 0; j < N; j++)\n      for (k = 0; k < N; k++)\n"
      "        C[i][j] += A[i][k] * B[k][j];\n";
  return {
      {"Identity", catalog_program(kVec, "  for (i = 1; i < N; i++)\n    A[i] = A[i - 1] + B[i];\n"),
       "  for (i = 1; i < N; i++)\n    A[i] = A[i - 1] + B[i];\n"},
      {"InterchangeOfIndependentLoops", catalog_program(kMat, nest),
       "  for (j = 0; j < N; j++)\n    for (i = 0; i < N; i++)\n      C[i][j] = A[i][j] + B[j][i];\n"},
      {"ParallelPragmaOnDependenceFreeLoop", catalog_program(kMat, nest), "  #pragma omp parallel for private(j)\n" + nest},
      {"Tiling32", catalog_program(kMat, nest),
       "  for (t1 = 0; t1 < (N + 31) / 32; t1++)\n    for (t2 = 0; t2 < (N + 31) / 32; t2++)\n"
       "      for (i = 32 * t1; i < 32 * t1 + 32 && i < N; i++)\n        for (j = 32 * t2; j < 32 * t2 + 32 && j < N; j++)\n"
       "          C[i][j] = A[i][j] + B[j][i];\n"},
      {"Fusion",
       catalog_program(kVec, "  for (i = 0; i < N; i++)\n    A[i] = B[i] + 1;\n  for (i = 0; i < N; i++)\n    C[i] = A[i] * 2;\n"),
       "  for (i = 0; i < N; i++) {\n    A[i] = B[i] + 1;\n    C[i] = A[i] * 2;\n  }\n"},
      {"Distribution",
       catalog_program(kVec, "  for (i = 0; i < N; i++) {\n    A[i] = B[i] + 1;\n    C[i] = A[i] * 2;\n  }\n"),
       "  for (i = 0; i < N; i++)\n    A[i] = B[i] + 1;\n  for (i = 0; i < N; i++)\n    C[i] = A[i] * 2;\n"},
      {"ReversalOfDependenceFreeLoop", catalog_program(kVec, "  for (i = 0; i < N; i++)\n    C[i] = A[i] * B[i];\n"),
       "  for (i = N - 1; i >= 0; i--)\n    C[i] = A[i] * B[i];\n"},
      {"UnrollByTwo", catalog_program(kVec, "  for (i = 0; i < N; i++)\n    C[i] = A[i] * B[i];\n", 17),
       "  for (i = 0; i + 1 < N; i += 2) {\n    C[i] = A[i] * B[i];\n    C[i + 1] = A[i + 1] * B[i + 1];\n  }\n"
       "  for (; i < N; i++)\n    C[i] = A[i] * B[i];\n"},
      {"GemmLoopInterchangeJK", catalog_program(kMat, gemm),
       "  for (i = 0; i < N; i++)\n    for (k = 0; k < N; k++)\n      for (j = 0; j < N; j++)\n"
       "        C[i][j] += A[i][k] * B[k][j];\n"},
      {"ParallelTiled", catalog_program(kMat, nest),
       "  #pragma omp parallel for private(t2, i, j)\n  for (t1 = 0; t1 < (N + 31) / 32; t1++)\n"
       "    for (t2 = 0; t2 < (N + 31) / 32; t2++)\n      for (i = 32 * t1; i < 32 * t1 + 32 && i < N; i++)\n"
       "        for (j = 32 * t2; j < 32 * t2 + 32 && j < N; j++)\n          C[i][j] = A[i][j] + B[j][i];\n"},
  };
}

}  // namespace scopt::test
