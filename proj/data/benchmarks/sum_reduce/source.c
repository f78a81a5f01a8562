int total(int n, const int* data) {
    int s = 0;
    for (int i = 0; i < n; i++)
        s += data[i];
    return s;
}
void sum_reduce(int n, const int* data, int* s) {
    *s = total(n, data);
}
