#include <iostream>

#include "pwm/cli.hpp"

int main(int argc, char** argv) { return pwm::cli::run(argc, argv, std::cout, std::cerr); }
