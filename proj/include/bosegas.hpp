#pragma once

// Everything except the command-line front end (bosegas/cli.hpp).
#include "bosegas/config.hpp"
#include "bosegas/dispersion.hpp"
#include "bosegas/dynamics.hpp"
#include "bosegas/errors.hpp"
#include "bosegas/field.hpp"
#include "bosegas/fit.hpp"
#include "bosegas/friction.hpp"
#include "bosegas/grid.hpp"
#include "bosegas/io.hpp"
#include "bosegas/parallel.hpp"
#include "bosegas/potential.hpp"
#include "bosegas/quadrature.hpp"
#include "bosegas/soliton.hpp"
#include "bosegas/spectral.hpp"
