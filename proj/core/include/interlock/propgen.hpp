#pragma once

#include <cstdint>
#include <vector>

#include "interlock/bltl.hpp"
#include "interlock/model.hpp"

namespace interlock {

/// Requirement classes of the generated suite.
enum PropertyClass : int {
  no_collision = 1,
  point_held_under_train = 2,
  point_set_for_move = 3,
  route_available = 4,
  component_released = 5,
};

bool is_safety(int cls);
bool is_availability(int cls);

/// Safety suite derived from the layout: one collision formula per track;
/// for every point, one point-holding formula per track incident to it; for
/// every point leg on a different track than the toe, one formula per
/// movement direction between the leg track and the toe track.
std::vector<Property> gen_safety(const InterlockingModel& model, std::uint64_t bound);

/// Availability suite: every requestable route is eventually set, every
/// subroute and immobilisation zone is eventually free.
std::vector<Property> gen_availability(const InterlockingModel& model,
                                       std::uint64_t bound, std::uint64_t window);

std::vector<Property> gen_properties(const InterlockingModel& model, std::uint64_t bound,
                                     std::uint64_t window);

}  // namespace interlock
