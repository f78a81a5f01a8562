void dot(int n, const int* a, const int* b, int* result) {
    int acc = 0;
    for (int i = 0; i < n; i++)
        acc += a[i] * b[i];
    *result = acc;
}
