#include "equinav/cli/app.hpp"

int main(int argc, char** argv) { return equinav::run_cli(argc, argv); }
