#include "photonic/cli.hpp"

int main(int argc, char** argv) { return photonic::cli::run(argc, argv); }
