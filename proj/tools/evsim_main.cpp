#include "evsim/cli.hpp"

int main(int argc, char** argv) { return evsim::cli::dispatch_main(argc, argv); }
