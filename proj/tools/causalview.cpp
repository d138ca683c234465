#include "causalview/cli.hpp"

int main(int argc, char** argv) { return causalview::cli::run(argc, argv); }
