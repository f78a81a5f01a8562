void fma_sub(int n, const int* u, const int* v, const int* w, int* out) {
    for (int i = 0; i < n; i++)
        out[i] = u[i] * v[i] - w[i];
}
