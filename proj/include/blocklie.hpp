#pragma once

#include "blocklie/rational.hpp"
#include "blocklie/error.hpp"
#include "blocklie/matrix.hpp"
#include "blocklie/poly.hpp"
#include "blocklie/algebra.hpp"
#include "blocklie/laurent.hpp"
#include "blocklie/algebra_checks.hpp"
#include "blocklie/module.hpp"
#include "blocklie/module_analysis.hpp"
#include "blocklie/verma.hpp"
#include "blocklie/lemma_lab.hpp"
#include "blocklie/report.hpp"
