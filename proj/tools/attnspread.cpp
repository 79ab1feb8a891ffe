#include "attnspread/cli.hpp"

int main(int argc, char** argv) { return attnspread::cli::run(argc, argv); }
