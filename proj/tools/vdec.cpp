#include "vdec/cli.hpp"

int main(int argc, char** argv) { return vdec::cli::main(argc, argv); }
