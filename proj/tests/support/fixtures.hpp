#pragma once

namespace scopt::test {

inline constexpr const char* kSyrkScop =
    "for (i = 0; i < N; i++) {\n"
    "  for (j = 0; j <= i; j++)\n"
    "    C[i][j] *= beta;\n"
    "  for (k = 0; k < M; k++)\n"
    "    for (j = 0; j <= i; j++)\n"
    "      C[i][j] += alpha * A[i][k] * A[j][k];\n"
    "}\n";

inline constexpr const char* kSyrkProgram =
    "#include <stdio.h>\n"
    "\n"
    "#define N 12\n"
    "#define M 10\n"
    "\n"
    "double alpha, beta;\n"
    "double C[N][N];\n"
    "double A[N][M];\n"
    "\n"
    "int main(void) {\n"
    "  int i, j, k;\n"
    "  alpha = 1.5;\n"
    "  beta = 1.2;\n"
    "  for (i = 0; i < N; i++)\n"
    "    for (j = 0; j < M; j++)\n"
    "      A[i][j] = (double)((i * j + 1) % N) / N;\n"
    "  for (i = 0; i < N; i++)\n"
    "    for (j = 0; j < N; j++)\n"
    "      C[i][j] = (double)((i * j + 2) % M) / M;\n"
    "#pragma scop\n"
    "  for (i = 0; i < N; i++) {\n"
    "    for (j = 0; j <= i; j++)\n"
    "      C[i][j] *= beta;\n"
    "    for (k = 0; k < M; k++)\n"
    "      for (j = 0; j <= i; j++)\n"
    "        C[i][j] += alpha * A[i][k] * A[j][k];\n"
    "  }\n"
    "#pragma endscop\n"
    "  double sum = 0.0;\n"
    "  for (i = 0; i < N; i++)\n"
    "    for (j = 0; j < N; j++)\n"
    "      sum += C[i][j];\n"
    "  printf(\"%.6f\\n\", sum);\n"
    "  return 0;\n"
    "}\n";

}  // namespace scopt::test
