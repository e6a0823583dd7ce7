class Board:
    def __init__(self, size: int = 15):
        self.size = size
