#include "morpheus/cli.hpp"

int main(int argc, char** argv) { return morpheus::run(argc, argv); }
