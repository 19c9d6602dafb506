#include "kblrn/cli.hpp"

int main(int argc, char** argv) { return kblrn::cli::run(argc, argv); }
