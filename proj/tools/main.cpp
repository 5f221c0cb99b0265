#include "iiaffine/cli.hpp"

int main(int argc, char** argv) { return iiaffine::cli::run(argc, argv); }
