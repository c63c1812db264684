#include "tokenledger/service/cli.hpp"

int main(int argc, char** argv) { return tokenledger::service::run_cli(argc, argv); }
