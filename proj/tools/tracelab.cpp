#include <tracelab/cli.hpp>

int main(int argc, char** argv) { return tracelab::cli::main(argc, argv); }
