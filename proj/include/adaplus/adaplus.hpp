#ifndef ADAPLUS_ADAPLUS_HPP
#define ADAPLUS_ADAPLUS_HPP

#include "adaplus/error.hpp"
#include "adaplus/hyper_params.hpp"
#include "adaplus/kernels.hpp"
#include "adaplus/lr_schedule.hpp"
#include "adaplus/oracle.hpp"
#include "adaplus/problems.hpp"
#include "adaplus/state.hpp"
#include "adaplus/transcript.hpp"

#endif
