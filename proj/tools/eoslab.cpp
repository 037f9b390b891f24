#include "eoslab/experiment_io.hpp"

int main(int argc, char** argv) { return eoslab::run_cli(argc, argv); }
