void row_sum(int rows, int cols, const int* M, int* out) {
    for (int r = 0; r < rows; r++) {
        int s = 0;
        for (int c = 0; c < cols; c++)
            s += M[r * cols + c];
        out[r] = s;
    }
}
