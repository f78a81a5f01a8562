void blend(int n, const int* p, const int* q, const int* r, int* out) {
    for (int i = 0; i < n; i++)
        out[i] = p[i] - q[i] * r[i];
}
