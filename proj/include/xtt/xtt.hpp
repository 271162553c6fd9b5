#pragma once

#include "complex.hpp"
#include "divisibility.hpp"
#include "hypergraph.hpp"
#include "io.hpp"
#include "randwalk.hpp"
#include "search.hpp"
#include "surgery.hpp"
#include "trails.hpp"
