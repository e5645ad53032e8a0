#include "wheelcon/cli.hpp"

int main(int argc, char** argv) { return wheelcon::cli::run(argc, argv); }
