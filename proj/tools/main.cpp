#include "reflecta/cli.hpp"

int main(int argc, char** argv) { return reflecta::cli::run(argc, argv); }
