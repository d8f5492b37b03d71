#ifndef SERIATE_SERIATE_HPP
#define SERIATE_SERIATE_HPP

#include "seriate/errors.hpp"
#include "seriate/graph.hpp"
#include "seriate/io.hpp"
#include "seriate/pqtree.hpp"
#include "seriate/seriation.hpp"
#include "seriate/spectral.hpp"

#endif  // SERIATE_SERIATE_HPP
