#pragma once

#include "hardy/errors.hpp"
#include "hardy/params.hpp"
#include "hardy/radial.hpp"
#include "hardy/tridiag.hpp"
#include "hardy/operator.hpp"
#include "hardy/special.hpp"
#include "hardy/frobenius.hpp"
#include "hardy/extremals.hpp"
#include "hardy/spectral.hpp"
#include "hardy/mass.hpp"
#include "hardy/expansion.hpp"
#include "hardy/robin3d.hpp"
#include "hardy/acceptance.hpp"
#include "hardy/config.hpp"
#include "hardy/report.hpp"
