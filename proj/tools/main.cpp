#include "lcbl/cli.hpp"

int main(int argc, char** argv) { return lcbl::run(argc, argv); }
