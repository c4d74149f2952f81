#include "crisislens/cli.hpp"

int main(int argc, char** argv) { return crisislens::run(argc, argv); }
