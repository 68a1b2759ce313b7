#include <cstdio>

int main() {
  std::puts("renalparse: CLI under construction");
  return 0;
}
