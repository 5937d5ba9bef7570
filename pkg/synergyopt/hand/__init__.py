"""Hand kinematics: joints, fingers, tendon routing and actuation parameters."""
