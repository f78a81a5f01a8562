void matmul(int m, int n, int p, const int* A, const int* B, int* C) {
    for (int i = 0; i < m; i++)
        for (int j = 0; j < p; j++) {
            int sum = 0;
            for (int k = 0; k < n; k++)
                sum += A[i * n + k] * B[k * p + j];
            C[i * p + j] = sum;
        }
}
