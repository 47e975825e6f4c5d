#include "mheat/cli.hpp"

int main(int argc, char** argv) { return mheat::run_cli(argc, argv); }
