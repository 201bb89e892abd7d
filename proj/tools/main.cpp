#include <iostream>

#include "driver.hpp"

int main(int argc, char** argv) { return qlab::cli::runMain(argc, argv, std::cout, std::cerr); }
