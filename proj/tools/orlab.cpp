// orlab: command-line front end. Subcommands land here as the library grows.
#include <cstdio>

int main(int argc, char** argv) {
  (void)argc;
  (void)argv;
  std::fprintf(stderr, "orlab: no subcommands wired up yet\n");
  return 2;
}
