#include "heavytail/cli.hpp"

int main(int argc, char** argv) { return heavytail::cli::dispatch(argc, argv); }
