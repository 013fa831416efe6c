#include "frictio/scenario.hpp"

int main(int argc, char** argv) { return frictio::cli::main(argc, argv); }
