void axpy(int n, int alpha, const int* x, const int* y, int* z) {
    for (int i = 0; i < n; i++) {
        z[i] = alpha * x[i] + y[i];
    }
}
