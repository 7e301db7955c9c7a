#pragma once

#include "fkpp/bounds.hpp"
#include "fkpp/csv.hpp"
#include "fkpp/discretization.hpp"
#include "fkpp/domain.hpp"
#include "fkpp/eigensolver.hpp"
#include "fkpp/errors.hpp"
#include "fkpp/experiments.hpp"
#include "fkpp/figures.hpp"
#include "fkpp/kernel.hpp"
#include "fkpp/steady.hpp"
#include "fkpp/svg.hpp"
