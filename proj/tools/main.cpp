#include <cstdio>

int main() {
    std::puts("polycstr cli placeholder");
    return 0;
}
