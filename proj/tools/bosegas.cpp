#include "bosegas/cli.hpp"

int main(int argc, char** argv) { return bosegas::cli::run(argc, argv); }
