from pydantic import BaseModel


class MessageResponse(BaseModel):
    """
    Error / status payload with a stable translation key.

    Attributes:
        translation_key: Machine-readable key (e.g. "error.domain.lambda_zero")
        message: Human-readable text printed on the diagnostic stream
    """
    translation_key: str
    message: str

    @classmethod
    def create(cls, translation_key: str, message: str) -> "MessageResponse":
        """Create a message with both translation key and message."""
        return cls(translation_key=translation_key, message=message)

    def render(self) -> str:
        return f"[{self.translation_key}] {self.message}"
