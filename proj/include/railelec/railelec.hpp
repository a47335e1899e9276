#pragma once

#include "railelec/assignment.hpp"
#include "railelec/config.hpp"
#include "railelec/corridors.hpp"
#include "railelec/costmodel.hpp"
#include "railelec/design.hpp"
#include "railelec/equilibrium.hpp"
#include "railelec/io.hpp"
#include "railelec/network.hpp"
#include "railelec/report.hpp"
