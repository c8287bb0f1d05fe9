#include "besynth/cli.hpp"

int main(int argc, char** argv) { return besynth::cliMain(argc, argv); }
