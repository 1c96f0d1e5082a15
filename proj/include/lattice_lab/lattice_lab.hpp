#pragma once

// Umbrella header for the lattice_lab library: modular-domain lattice
// geometry, certified lattice sums (general energies, Epstein zeta, theta),
// first and second derivatives with stability classification, closed-form
// area thresholds for Lennard-Jones-type potentials, and restricted/full
// energy minimization with phase-diagram sweeps.

#include "lattice_lab/lattice.hpp"
#include "lattice_lab/potential.hpp"
#include "lattice_lab/sums.hpp"
#include "lattice_lab/derivatives.hpp"
#include "lattice_lab/optim.hpp"
#include "lattice_lab/thresholds.hpp"
#include "lattice_lab/minimize.hpp"
#include "lattice_lab/report.hpp"
