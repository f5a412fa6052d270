#include <cstdio>
int main(){ std::puts("animarl"); return 0; }
