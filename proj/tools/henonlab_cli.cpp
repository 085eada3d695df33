#include <cstdio>
int main() { std::puts("henonlab cli: not yet implemented"); return 1; }
