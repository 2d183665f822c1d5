#pragma once

// Everything in one include.
#include "bext/conformal_io.hpp"
#include "bext/connectivity.hpp"
#include "bext/crosscut.hpp"
#include "bext/domain_io.hpp"
#include "bext/effective_sets.hpp"
