#include <stdio.h>

#define N 2048

double A[N][N], x[N], y[N];

int main(void) {
  int i, j;
#pragma scop
  for (i = 0; i < N; i++) {
    y[i] = 0;
    for (j = 0; j < N; j++)
      y[i] = y[i] + A[j][i] * x[j];
  }
#pragma endscop
  printf("%f\n", y[1]);
  return 0;
}
