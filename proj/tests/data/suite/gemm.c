#include <stdio.h>

#define NI 400
#define NJ 400
#define NK 400

double alpha = 1.5;
double A[NI][NK], B[NK][NJ], C[NI][NJ];

int main(void) {
  int i, j, k;
  for (i = 0; i < NI; i++)
    for (j = 0; j < NJ; j++) {
      A[i][j] = (double)(i * j % 7) / 7;
      B[i][j] = (double)((i + j) % 5) / 5;
      C[i][j] = 0;
    }
#pragma scop
  for (i = 0; i < NI; i++)
    for (j = 0; j < NJ; j++)
      for (k = 0; k < NK; k++)
        C[i][j] += alpha * A[i][k] * B[k][j];
#pragma endscop
  printf("%f\n", C[3][5]);
  return 0;
}
