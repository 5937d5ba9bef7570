"""Contact, grasp and actuation matrices."""
