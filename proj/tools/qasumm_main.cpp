#include "qasumm/cli.hpp"

int main(int argc, char** argv) { return qasumm::dispatch(argc, argv); }
