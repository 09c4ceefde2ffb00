#include "hypercross/cli.hpp"

int main(int argc, char** argv) { return hypercross::cli::run(argc, argv); }
