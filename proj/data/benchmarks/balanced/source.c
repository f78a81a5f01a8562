void scaled_sum(int n, const int* x, const int* y, const int* z, int* out) {
    for (int i = 0; i < n; i++) {
        int t = x[i] + y[i];
        out[i] = t * z[i];
    }
}
