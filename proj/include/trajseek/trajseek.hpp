#ifndef TRAJSEEK_TRAJSEEK_HPP
#define TRAJSEEK_TRAJSEEK_HPP

#include "trajseek/core.hpp"
#include "trajseek/csv_io.hpp"
#include "trajseek/datagen.hpp"
#include "trajseek/engine.hpp"
#include "trajseek/index.hpp"
#include "trajseek/oracle.hpp"
#include "trajseek/perfmodel.hpp"
#include "trajseek/perfmodel_io.hpp"
#include "trajseek/planner.hpp"
#include "trajseek/worker_pool.hpp"

#endif // TRAJSEEK_TRAJSEEK_HPP
