#pragma once

// Umbrella header for the betlab expected-utility toolkit: exact lottery
// algebra, utility-of-money functions with indifference-probability analysis,
// simultaneous-allocation reports, backward-induction solving of sequential
// bet problems, and the brute-force policy oracle.

#include "betlab/errors.hpp"
#include "betlab/money.hpp"
#include "betlab/oracle.hpp"
#include "betlab/sequential.hpp"
#include "betlab/simultaneous.hpp"
#include "betlab/utility.hpp"
