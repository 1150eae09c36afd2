import hypothesis

hypothesis.settings.register_profile(
    "swiptsim", deadline=None, max_examples=50)
hypothesis.settings.load_profile("swiptsim")
