void scale(int n, const int* in, int* out) {
    int i;
    for (i = 0; i < n; ++i) {
        out[i] = 3 * in[i];
    }
}
